//! Direct Skolemisation of arbitrary (non-normalized) axioms, used to check
//! that normalization preserves certain answers. Every existential
//! occurrence gets its own function symbol.

use std::collections::BTreeSet;

use crate::kb::{Axiom, Concept, ConceptExpr, GeneralAxiom, KnowledgeBase};
use crate::rewrite::{top_clauses, Atom, Clause, LogicProgram, ProgramKind, Term};

struct Skolemizer {
    rules: BTreeSet<Clause>,
    next_fn: usize,
    next_var: usize,
}

fn normalized_as_general(ax: &Axiom) -> GeneralAxiom {
    use ConceptExpr as E;
    let e = |c: &Concept| E::from(c);
    match ax {
        Axiom::NominalSub { individual, sup } => GeneralAxiom::SubClassOf {
            sub: E::Nominal(individual.clone()),
            sup: e(sup),
        },
        Axiom::ConceptSub { sub, sup } => GeneralAxiom::SubClassOf {
            sub: e(sub),
            sup: e(sup),
        },
        Axiom::SubNominal { sub, individual } => GeneralAxiom::SubClassOf {
            sub: e(sub),
            sup: E::Nominal(individual.clone()),
        },
        Axiom::ConjSub { left, right, sup } => GeneralAxiom::SubClassOf {
            sub: E::and(e(left), e(right)),
            sup: e(sup),
        },
        Axiom::ExistsLhs { role, filler, sup } => GeneralAxiom::SubClassOf {
            sub: E::exists(role.clone(), e(filler)),
            sup: e(sup),
        },
        Axiom::ExistsRhs { sub, role, filler } => GeneralAxiom::SubClassOf {
            sub: e(sub),
            sup: E::exists(role.clone(), e(filler)),
        },
        Axiom::Range { role, concept } => GeneralAxiom::Range {
            role: role.clone(),
            filler: e(concept),
        },
        Axiom::RoleSub { .. } => unreachable!("role inclusions are translated directly"),
    }
}

impl Skolemizer {
    fn var(&mut self) -> Term {
        self.next_var += 1;
        Term::Var(format!("v{}", self.next_var))
    }

    /// Body atoms expressing `t ∈ e`; `None` if `e` is unsatisfiable.
    fn body(&mut self, e: &ConceptExpr, t: &Term, out: &mut Vec<Atom>) -> Option<()> {
        match e {
            ConceptExpr::Top => out.push(Atom::concept(Concept::Top, t.clone())),
            ConceptExpr::Bot => return None,
            ConceptExpr::Atomic(a) => {
                out.push(Atom::concept(Concept::Atomic(a.clone()), t.clone()))
            }
            ConceptExpr::Nominal(i) => out.push(Atom::eq(t.clone(), Term::Named(i.clone()))),
            ConceptExpr::And(a, b) => {
                self.body(a, t, out)?;
                self.body(b, t, out)?;
            }
            ConceptExpr::Exists(r, f) => {
                let y = self.var();
                out.push(Atom::role(r.clone(), t.clone(), y.clone()));
                self.body(f, &y, out)?;
            }
        }
        Some(())
    }

    /// Head atoms making `t ∈ e` true.
    fn head(&mut self, e: &ConceptExpr, t: &Term, out: &mut Vec<Atom>) {
        match e {
            ConceptExpr::Top => out.push(Atom::concept(Concept::Top, t.clone())),
            ConceptExpr::Bot => out.push(Atom::concept(Concept::Bot, t.clone())),
            ConceptExpr::Atomic(a) => {
                out.push(Atom::concept(Concept::Atomic(a.clone()), t.clone()))
            }
            ConceptExpr::Nominal(i) => out.push(Atom::eq(t.clone(), Term::Named(i.clone()))),
            ConceptExpr::And(a, b) => {
                self.head(a, t, out);
                self.head(b, t, out);
            }
            ConceptExpr::Exists(r, f) => {
                let tag = Concept::Atomic(format!("_:sk{}", self.next_fn));
                self.next_fn += 1;
                let succ = Term::Func(r.clone(), tag, Box::new(t.clone()));
                out.push(Atom::role(r.clone(), t.clone(), succ.clone()));
                self.head(f, &succ, out);
            }
        }
    }

    fn emit(&mut self, body: Vec<Atom>, heads: Vec<Atom>) {
        for h in heads {
            self.rules.insert(Clause::new(body.clone(), h));
        }
    }

    fn axiom(&mut self, ax: &GeneralAxiom) {
        let x = Term::var("x");
        let mut heads = Vec::new();
        match ax {
            GeneralAxiom::SubClassOf {
                sub: ConceptExpr::Nominal(a),
                sup,
            } => {
                self.head(sup, &Term::Named(a.clone()), &mut heads);
                self.emit(Vec::new(), heads);
            }
            GeneralAxiom::SubClassOf { sub, sup } => {
                let mut body = Vec::new();
                if self.body(sub, &x, &mut body).is_none() {
                    return;
                }
                self.head(sup, &x, &mut heads);
                self.emit(body, heads);
            }
            GeneralAxiom::Range { role, filler } => {
                let y = Term::var("y");
                self.head(filler, &y, &mut heads);
                self.emit(vec![Atom::role(role.clone(), x, y)], heads);
            }
        }
    }
}

/// Skolemised program of an arbitrary KB, with the `⊤` clauses of its
/// signature. Variables that the body does not bind never reach a head,
/// because every head term is built from `x` (or `y` for ranges).
pub fn skolemize(kb: &KnowledgeBase) -> LogicProgram {
    let mut s = Skolemizer {
        rules: BTreeSet::new(),
        next_fn: 0,
        next_var: 0,
    };
    for ax in kb.tbox() {
        if let Axiom::RoleSub { sub, sup } = ax {
            let (x, y) = (Term::var("x"), Term::var("y"));
            s.rules.insert(Clause::new(
                [Atom::role(sub.clone(), x.clone(), y.clone())],
                Atom::role(sup.clone(), x, y),
            ));
        } else {
            s.axiom(&normalized_as_general(ax));
        }
    }
    for ax in kb.general_axioms() {
        s.axiom(ax);
    }
    LogicProgram {
        kind: ProgramKind::Xi,
        rules: s.rules,
        top: top_clauses(kb),
        facts: kb.abox().iter().map(Atom::from).collect(),
        equality: BTreeSet::new(),
        reflexivity: false,
    }
}
