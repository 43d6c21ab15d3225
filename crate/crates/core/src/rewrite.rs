//! Translation of normalized knowledge bases into Horn programs.
//!
//! [`xi_translate`] keeps existentials as unary function symbols
//! `f_{R,A}`; [`dat_translate`] replaces each `f_{R,A}(x)` by the single
//! auxiliary constant `o_{R,A}` and so yields function-free datalog.

use std::collections::BTreeSet;
use std::fmt;

use crate::kb::{normalize, AboxFact, Axiom, Concept, Individual, KnowledgeBase, Role, AUX_PREFIX};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Term {
    Named(Individual),
    /// The auxiliary constant `o_{R,A}`.
    Aux(Role, Concept),
    /// The function term `f_{R,A}(w)`.
    Func(Role, Concept, Box<Term>),
    Var(String),
}

impl Term {
    pub fn named(name: &str) -> Self {
        Term::Named(Individual::new(name))
    }

    pub fn var(name: &str) -> Self {
        Term::Var(name.to_string())
    }

    pub fn aux(role: &str, concept: Concept) -> Self {
        Term::Aux(Role::new(role), concept)
    }

    pub fn is_var(&self) -> bool {
        matches!(self, Term::Var(_))
    }

    pub fn is_ground(&self) -> bool {
        match self {
            Term::Var(_) => false,
            Term::Func(_, _, inner) => inner.is_ground(),
            _ => true,
        }
    }

    pub fn is_named(&self) -> bool {
        matches!(self, Term::Named(_))
    }

    /// Nesting depth of function symbols.
    pub fn depth(&self) -> usize {
        match self {
            Term::Func(_, _, inner) => 1 + inner.depth(),
            _ => 0,
        }
    }

    fn vars<'a>(&'a self, out: &mut BTreeSet<&'a str>) {
        match self {
            Term::Var(v) => {
                out.insert(v);
            }
            Term::Func(_, _, inner) => inner.vars(out),
            _ => {}
        }
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Term::Named(a) => write!(f, "{a}"),
            Term::Aux(r, c) => write!(f, "{AUX_PREFIX}{r}:{c}"),
            Term::Func(r, c, inner) => write!(f, "f_{r}_{c}({inner})"),
            Term::Var(v) => write!(f, "?{v}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Predicate {
    Concept(Concept),
    Role(Role),
    /// The equality predicate `≈`.
    Eq,
}

impl Predicate {
    pub fn arity(&self) -> usize {
        match self {
            Predicate::Concept(_) => 1,
            _ => 2,
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Predicate::Concept(c) => c.name(),
            Predicate::Role(r) => r.as_str(),
            Predicate::Eq => "eq",
        }
    }
}

impl fmt::Display for Predicate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Atom {
    pub predicate: Predicate,
    pub args: Vec<Term>,
}

impl Atom {
    pub fn new(predicate: Predicate, args: Vec<Term>) -> Self {
        assert_eq!(
            predicate.arity(),
            args.len(),
            "arity mismatch for {predicate}"
        );
        Atom { predicate, args }
    }

    pub fn concept(c: Concept, t: Term) -> Self {
        Atom::new(Predicate::Concept(c), vec![t])
    }

    pub fn role(r: Role, s: Term, t: Term) -> Self {
        Atom::new(Predicate::Role(r), vec![s, t])
    }

    pub fn eq(s: Term, t: Term) -> Self {
        Atom::new(Predicate::Eq, vec![s, t])
    }

    pub fn is_ground(&self) -> bool {
        self.args.iter().all(Term::is_ground)
    }

    pub fn vars(&self) -> BTreeSet<&str> {
        let mut out = BTreeSet::new();
        for t in &self.args {
            t.vars(&mut out);
        }
        out
    }
}

impl From<&AboxFact> for Atom {
    fn from(fact: &AboxFact) -> Self {
        match fact {
            AboxFact::Concept(c, a) => Atom::concept(c.clone(), Term::Named(a.clone())),
            AboxFact::Role(r, a, b) => {
                Atom::role(r.clone(), Term::Named(a.clone()), Term::Named(b.clone()))
            }
        }
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}(", self.predicate)?;
        for (i, t) in self.args.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{t}")?;
        }
        f.write_str(")")
    }
}

/// A Horn clause `body → head`. The body is kept sorted and deduplicated.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Clause {
    body: Vec<Atom>,
    head: Atom,
}

impl Clause {
    pub fn new(body: impl IntoIterator<Item = Atom>, head: Atom) -> Self {
        let body: BTreeSet<Atom> = body.into_iter().collect();
        Clause {
            body: body.into_iter().collect(),
            head,
        }
    }

    pub fn fact(head: Atom) -> Self {
        Clause::new([], head)
    }

    pub fn body(&self) -> &[Atom] {
        &self.body
    }

    pub fn head(&self) -> &Atom {
        &self.head
    }

    /// Every head variable occurs in the body.
    pub fn is_safe(&self) -> bool {
        let body_vars: BTreeSet<&str> = self.body.iter().flat_map(Atom::vars).collect();
        self.head.vars().is_subset(&body_vars)
    }
}

impl fmt::Display for Clause {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.head)?;
        if !self.body.is_empty() {
            f.write_str(" :- ")?;
            for (i, a) in self.body.iter().enumerate() {
                if i > 0 {
                    f.write_str(", ")?;
                }
                write!(f, "{a}")?;
            }
        }
        f.write_str(".")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ProgramKind {
    /// Ξ(K): existentials become function terms.
    Xi,
    /// dat(K): existentials become auxiliary constants.
    Dat,
}

/// Output of a translation: TBox clauses, the `Top` clauses, ABox facts,
/// and (once [`LogicProgram::with_equality`] ran) the equality axioms.
///
/// Reflexivity `→ x ≈ x` is unsafe as a clause; it is carried as the
/// `reflexivity` flag meaning "`c ≈ c` for every constant of the active
/// domain".
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LogicProgram {
    pub kind: ProgramKind,
    pub rules: BTreeSet<Clause>,
    pub top: BTreeSet<Clause>,
    pub facts: BTreeSet<Atom>,
    pub equality: BTreeSet<Clause>,
    pub reflexivity: bool,
}

impl LogicProgram {
    pub fn clauses(&self) -> impl Iterator<Item = &Clause> {
        self.rules.iter().chain(&self.top).chain(&self.equality)
    }

    pub fn has_equality(&self) -> bool {
        self.reflexivity
    }

    /// Predicates occurring in clauses or facts.
    pub fn predicates(&self) -> BTreeSet<Predicate> {
        let mut out = BTreeSet::new();
        for c in self.clauses() {
            out.insert(c.head.predicate.clone());
            out.extend(c.body.iter().map(|a| a.predicate.clone()));
        }
        out.extend(self.facts.iter().map(|a| a.predicate.clone()));
        out
    }

    /// Function symbols `f_{R,A}`, identified by their `(R, A)` pair.
    pub fn function_symbols(&self) -> BTreeSet<(Role, Concept)> {
        fn walk(t: &Term, out: &mut BTreeSet<(Role, Concept)>) {
            if let Term::Func(r, c, inner) = t {
                out.insert((r.clone(), c.clone()));
                walk(inner, out);
            }
        }
        let mut out = BTreeSet::new();
        for c in self.clauses() {
            for a in c.body.iter().chain(std::iter::once(&c.head)) {
                a.args.iter().for_each(|t| walk(t, &mut out));
            }
        }
        out
    }

    /// Adds the equality axioms for this program's signature.
    pub fn with_equality(mut self) -> Self {
        if !self.reflexivity {
            self.equality = equality_axioms(&self);
            self.reflexivity = true;
        }
        self
    }

    /// Canonical text form: one clause or fact per line, sorted within
    /// `% tbox`, `% top`, `% abox` and (if present) `% equality` sections.
    pub fn to_text(&self) -> String {
        fn section(out: &mut String, title: &str, lines: impl Iterator<Item = String>) {
            let mut lines: Vec<String> = lines.collect();
            lines.sort();
            out.push_str("% ");
            out.push_str(title);
            out.push('\n');
            for l in lines {
                out.push_str(&l);
                out.push('\n');
            }
        }
        let mut out = String::new();
        section(&mut out, "tbox", self.rules.iter().map(|c| c.to_string()));
        section(&mut out, "top", self.top.iter().map(|c| c.to_string()));
        section(&mut out, "abox", self.facts.iter().map(|a| format!("{a}.")));
        if self.reflexivity {
            section(
                &mut out,
                "equality",
                self.equality.iter().map(|c| c.to_string()),
            );
            out.push_str("% builtin: eq(c,c) for every constant c of the active domain\n");
        }
        out
    }
}

fn x() -> Term {
    Term::var("x")
}

fn y() -> Term {
    Term::var("y")
}

/// A body atom `C(t)`, or nothing when `C` is `Top` and another body atom
/// already binds `t` (the `Top` clauses then supply `Top(t)`).
fn guard(c: &Concept, t: Term, bound: bool) -> Option<Atom> {
    (*c != Concept::Top || !bound).then(|| Atom::concept(c.clone(), t))
}

fn translate_axiom(ax: &Axiom, kind: ProgramKind) -> Vec<Clause> {
    let cat = |c: &Concept, t: Term| Atom::concept(c.clone(), t);
    match ax {
        Axiom::NominalSub { individual, sup } => {
            vec![Clause::fact(cat(sup, Term::Named(individual.clone())))]
        }
        Axiom::ConceptSub { sub, sup } => vec![Clause::new([cat(sub, x())], cat(sup, x()))],
        Axiom::SubNominal { sub, individual } => {
            vec![Clause::new(
                [cat(sub, x())],
                Atom::eq(x(), Term::Named(individual.clone())),
            )]
        }
        Axiom::ConjSub { left, right, sup } => {
            let body = if left == right {
                vec![cat(left, x())]
            } else {
                let l = guard(left, x(), *right != Concept::Top);
                let r = guard(right, x(), *left != Concept::Top);
                l.into_iter().chain(r).collect()
            };
            vec![Clause::new(body, cat(sup, x()))]
        }
        Axiom::ExistsLhs { role, filler, sup } => {
            let body =
                std::iter::once(Atom::role(role.clone(), x(), y())).chain(guard(filler, y(), true));
            vec![Clause::new(body, cat(sup, x()))]
        }
        Axiom::ExistsRhs { sub, role, filler } => {
            let witness = match kind {
                ProgramKind::Xi => Term::Func(role.clone(), filler.clone(), Box::new(x())),
                ProgramKind::Dat => Term::Aux(role.clone(), filler.clone()),
            };
            vec![
                Clause::new(
                    [cat(sub, x())],
                    Atom::role(role.clone(), x(), witness.clone()),
                ),
                Clause::new([cat(sub, x())], cat(filler, witness)),
            ]
        }
        Axiom::RoleSub { sub, sup } => vec![Clause::new(
            [Atom::role(sub.clone(), x(), y())],
            Atom::role(sup.clone(), x(), y()),
        )],
        Axiom::Range { role, concept } => {
            vec![Clause::new(
                [Atom::role(role.clone(), x(), y())],
                cat(concept, y()),
            )]
        }
    }
}

fn translate(kb: &KnowledgeBase, kind: ProgramKind) -> LogicProgram {
    let normalized;
    let kb = if kb.is_normalized() {
        kb
    } else {
        normalized = normalize(kb);
        &normalized
    };
    LogicProgram {
        kind,
        rules: kb
            .tbox()
            .iter()
            .flat_map(|ax| translate_axiom(ax, kind))
            .collect(),
        top: top_clauses(kb),
        facts: kb.abox().iter().map(Atom::from).collect(),
        equality: BTreeSet::new(),
        reflexivity: false,
    }
}

/// Ξ(K) = Ξ(T) ∪ ⊤(T) ∪ A. Non-normalized input is normalized first.
pub fn xi_translate(kb: &KnowledgeBase) -> LogicProgram {
    translate(kb, ProgramKind::Xi)
}

/// dat(K) = dat(T) ∪ ⊤(T) ∪ A. Non-normalized input is normalized first.
pub fn dat_translate(kb: &KnowledgeBase) -> LogicProgram {
    translate(kb, ProgramKind::Dat)
}

/// `A(x) → Top(x)` for each atomic concept and `R(x,y) → Top(x)`,
/// `R(x,y) → Top(y)` for each role occurring in the TBox.
pub fn top_clauses(kb: &KnowledgeBase) -> BTreeSet<Clause> {
    let (concepts, roles) = kb.tbox_predicates();
    let top = |t: Term| Atom::concept(Concept::Top, t);
    let mut out = BTreeSet::new();
    for c in concepts {
        out.insert(Clause::new(
            [Atom::concept(Concept::Atomic(c), x())],
            top(x()),
        ));
    }
    for r in roles {
        let body = Atom::role(r, x(), y());
        out.insert(Clause::new([body.clone()], top(x())));
        out.insert(Clause::new([body], top(y())));
    }
    out
}

/// Symmetry, transitivity, one replacement clause per argument position of
/// every predicate, and (for Ξ programs) functional reflexivity per
/// function symbol. Reflexivity itself is the program's builtin flag.
pub fn equality_axioms(program: &LogicProgram) -> BTreeSet<Clause> {
    let v = |n: &str| Term::var(n);
    let mut out = BTreeSet::new();
    out.insert(Clause::new(
        [Atom::eq(v("x"), v("y"))],
        Atom::eq(v("y"), v("x")),
    ));
    out.insert(Clause::new(
        [Atom::eq(v("x"), v("y")), Atom::eq(v("y"), v("z"))],
        Atom::eq(v("x"), v("z")),
    ));
    for p in program.predicates() {
        match p {
            Predicate::Eq => {}
            Predicate::Concept(c) => {
                out.insert(Clause::new(
                    [Atom::concept(c.clone(), v("x")), Atom::eq(v("x"), v("x2"))],
                    Atom::concept(c, v("x2")),
                ));
            }
            Predicate::Role(r) => {
                let base = Atom::role(r.clone(), v("x"), v("y"));
                out.insert(Clause::new(
                    [base.clone(), Atom::eq(v("x"), v("x2"))],
                    Atom::role(r.clone(), v("x2"), v("y")),
                ));
                out.insert(Clause::new(
                    [base, Atom::eq(v("y"), v("y2"))],
                    Atom::role(r, v("x"), v("y2")),
                ));
            }
        }
    }
    if program.kind == ProgramKind::Xi {
        for (r, c) in program.function_symbols() {
            let f = |t: Term| Term::Func(r.clone(), c.clone(), Box::new(t));
            out.insert(Clause::new(
                [Atom::eq(v("x"), v("x2"))],
                Atom::eq(f(v("x")), f(v("x2"))),
            ));
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kb::parse_kb;

    fn lines(set: &BTreeSet<Clause>) -> BTreeSet<String> {
        set.iter().map(|c| c.to_string()).collect()
    }

    fn strs(items: &[&str]) -> BTreeSet<String> {
        items.iter().map(|s| s.to_string()).collect()
    }

    #[test]
    fn nominal_superclass_becomes_equality() {
        let p = xi_translate(&parse_kb("JProf SubClassOf {john}").unwrap());
        assert_eq!(lines(&p.rules), strs(&["eq(?x,john) :- JProf(?x)."]));
    }

    #[test]
    fn empty_tbox_keeps_only_facts() {
        let p = xi_translate(&parse_kb("Top(a).").unwrap());
        assert!(p.rules.is_empty() && p.top.is_empty());
        assert_eq!(p.facts.len(), 1);
    }

    #[test]
    fn existential_rhs_in_both_translations() {
        let kb = parse_kb("Prof SubClassOf some advisor Prof").unwrap();
        assert_eq!(
            lines(&xi_translate(&kb).rules),
            strs(&[
                "Prof(f_advisor_Prof(?x)) :- Prof(?x).",
                "advisor(?x,f_advisor_Prof(?x)) :- Prof(?x).",
            ])
        );
        let kb = parse_kb("KRC SubClassOf some taught JProf").unwrap();
        assert_eq!(
            lines(&dat_translate(&kb).rules),
            strs(&[
                "JProf(aux:taught:JProf) :- KRC(?x).",
                "taught(?x,aux:taught:JProf) :- KRC(?x).",
            ])
        );
    }

    #[test]
    fn translations_agree_without_existentials() {
        let kb =
            parse_kb("A SubClassOf B\nA and B SubClassOf {c}\nsome r A SubClassOf B\nrange r A")
                .unwrap();
        let (xi, dat) = (xi_translate(&kb), dat_translate(&kb));
        assert_eq!(xi.rules, dat.rules);
        assert_eq!(xi.top, dat.top);
    }

    #[test]
    fn auxiliary_constant_is_shared() {
        let kb = parse_kb("A SubClassOf some R C\nB SubClassOf some R C").unwrap();
        let p = dat_translate(&kb);
        let auxes: BTreeSet<String> = p
            .rules
            .iter()
            .flat_map(|c| c.head().args.clone())
            .filter(|t| matches!(t, Term::Aux(..)))
            .map(|t| t.to_string())
            .collect();
        assert_eq!(auxes, strs(&["aux:R:C"]));
    }

    #[test]
    fn top_clause_shapes() {
        let kb = parse_kb("some taught Top SubClassOf Course").unwrap();
        assert_eq!(
            lines(&top_clauses(&kb)),
            strs(&[
                "Top(?x) :- Course(?x).",
                "Top(?x) :- taught(?x,?y).",
                "Top(?y) :- taught(?x,?y).",
            ])
        );
        assert!(top_clauses(&parse_kb("").unwrap()).is_empty());
    }

    #[test]
    fn top_guards_are_dropped_when_bound() {
        let kb = parse_kb("A and Top SubClassOf B\nTop and Top SubClassOf C").unwrap();
        assert_eq!(
            lines(&dat_translate(&kb).rules),
            strs(&["B(?x) :- A(?x).", "C(?x) :- Top(?x)."])
        );
    }

    #[test]
    fn replacement_clauses_per_position() {
        let kb = parse_kb("range taught Prof").unwrap();
        let eq = equality_axioms(&dat_translate(&kb));
        let eq = lines(&eq);
        assert!(eq.contains("taught(?x2,?y) :- taught(?x,?y), eq(?x,?x2)."));
        assert!(eq.contains("taught(?x,?y2) :- taught(?x,?y), eq(?y,?y2)."));
        assert!(eq.contains("Prof(?x2) :- Prof(?x), eq(?x,?x2)."));
    }

    #[test]
    fn functional_reflexivity_only_for_xi() {
        let kb = parse_kb("Prof SubClassOf some advisor Prof").unwrap();
        let xi = lines(&equality_axioms(&xi_translate(&kb)));
        assert!(xi.contains("eq(f_advisor_Prof(?x),f_advisor_Prof(?x2)) :- eq(?x,?x2)."));
        let dat = lines(&equality_axioms(&dat_translate(&kb)));
        assert!(!dat.iter().any(|l| l.contains("f_")));
    }

    #[test]
    fn predicate_free_program_gets_symmetry_and_transitivity() {
        let p = dat_translate(&parse_kb("").unwrap());
        assert_eq!(
            lines(&equality_axioms(&p)),
            strs(&[
                "eq(?x,?z) :- eq(?x,?y), eq(?y,?z).",
                "eq(?y,?x) :- eq(?x,?y)."
            ])
        );
    }

    #[test]
    fn clauses_are_safe() {
        let kb =
            parse_kb("A SubClassOf some r B\nsome r B SubClassOf C\nrange r D\n{a} SubClassOf A")
                .unwrap();
        let p = xi_translate(&kb).with_equality();
        assert!(p.clauses().all(Clause::is_safe));
    }
}
